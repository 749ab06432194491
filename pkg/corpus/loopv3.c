extern int __VERIFIER_nondet_int(void);

int main() {
  int i = 0;
  int x = __VERIFIER_nondet_int();
  while (i < 50000001) {
    if (__VERIFIER_nondet_int() != 0) {
      i = i + 8;
    }
  }
  x = i;
  return 0;
}

extern int __VERIFIER_nondet_int(void);

int main() {
  int i = 0;
  int j = 0;
  int k = __VERIFIER_nondet_int();
  while (i < 10) {
    j = 0;
    while (j < 10) {
      j = j + 1;
    }
    i = i + 1;
  }
  return 0;
}

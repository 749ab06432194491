extern int __VERIFIER_nondet_int(void);

int main() {
  int x = __VERIFIER_nondet_int();
  int y = x;
  int z = y;
  while (__VERIFIER_nondet_int()) {
    x = x + 1;
    y = y + 1;
  }
  z = x;
  return 0;
}

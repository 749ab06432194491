extern int __VERIFIER_nondet_int(void);

int main() {
  int w = __VERIFIER_nondet_int();
  int x = w;
  int y = w;
  int z = x;
  while (__VERIFIER_nondet_int()) {
    if (w > 100) {
      w = z;
    } else {
      z = w;
    }
    x = w;
    y = z;
  }
  return 0;
}

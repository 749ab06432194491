extern int __VERIFIER_nondet_int(void);

int main() {
  int x = __VERIFIER_nondet_int();
  int y = __VERIFIER_nondet_int();
  int z = 0;
  while (z < 100) {
    if (x < y) {
      x = x + 1;
    } else {
      y = y + 1;
    }
    z = z + 1;
  }
  z = x;
  return 0;
}

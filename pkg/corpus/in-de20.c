extern int __VERIFIER_nondet_int(void);

int main() {
  int n = __VERIFIER_nondet_int();
  int x = n;
  int y = 0;
  int z = 0;
  while (x > 0) {
    x = x - 1;
    y = y + 1;
  }
  while (y > 0) {
    y = y - 1;
    z = z + 1;
  }
  x = z;
  return 0;
}

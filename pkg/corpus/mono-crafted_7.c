extern int __VERIFIER_nondet_int(void);

int main() {
  int x = 1000000;
  int y = 50000;
  int z = 0;
  int k = 0;
  while (y > 0) {
    x = x - 2;
    y = y - 2;
    k = k + 1;
    if (x < y) {
      z = z + 1;
    } else {
      z = z - 1;
    }
  }
  x = z;
  y = k;
  return 0;
}

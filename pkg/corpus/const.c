extern int __VERIFIER_nondet_int(void);

int main() {
  int c = 0;
  int x = 1;
  int y = 2;
  int z = 3;
  while (c < 10) {
    if (c > 5) {
      x = y;
    } else {
      y = x;
    }
    c = c + 1;
  }
  z = x;
  return 0;
}

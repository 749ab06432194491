extern int __VERIFIER_nondet_int(void);

int main() {
  int x = __VERIFIER_nondet_int();
  int y = x;
  int z = 0;
  while (z < x) {
    y = y + 1;
    z = z + 1;
  }
  y = z;
  return 0;
}

extern int __VERIFIER_nondet_int(void);
extern void __VERIFIER_assert(int);

int main() {
  int x = 0;
  int y = 50;
  int z = 0;
  while (__VERIFIER_nondet_int()) {
    if (x < 50) {
      x = x + 1;
    } else {
      y = y + 1;
    }
    z = z + 1;
  }
  __VERIFIER_assert(x <= 50);
  return 0;
}

extern int __VERIFIER_nondet_int(void);
extern void __VERIFIER_assert(int);

int main() {
  int x = 1;
  int y = 0;
  while (y < 1000) {
    x = x + y;
    y = y + 1;
  }
  __VERIFIER_assert(x >= y);
  return 0;
}

extern int __VERIFIER_nondet_int(void);
extern void __VERIFIER_assert(int);

int main() {
  int i = 1;
  int j = 10;
  int k = __VERIFIER_nondet_int();
  while (j >= i) {
    i = i + 2;
    j = j - 1;
  }
  k = i;
  __VERIFIER_assert(j == 6);
  return 0;
}

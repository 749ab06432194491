extern int __VERIFIER_nondet_int(void);
extern void __VERIFIER_assert(int);

int main() {
  int i = __VERIFIER_nondet_int();
  i = 0;
  while (i < 10) {
    i = i + 2;
  }
  __VERIFIER_assert(i == 10);
  return 0;
}

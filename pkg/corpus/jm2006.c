extern int __VERIFIER_nondet_int(void);

int main() {
  int i = __VERIFIER_nondet_int();
  int j = __VERIFIER_nondet_int();
  if (i < 0)
    i = 0;
  if (j < 0)
    j = 0;
  while (i > 0) {
    i = i - 1;
    j = j - 1;
  }
  int x = j;
  return 0;
}

extern int __VERIFIER_nondet_int(void);

int main() {
  int a = __VERIFIER_nondet_int();
  int i = 1;
  int j = 0;
  int k = 0;
  while (j < 10) {
    j = j + 1;
  }
  k = j;
  while (i < k) {
    i = i + 1;
    a = a - 1;
  }
  a = i;
  return 0;
}

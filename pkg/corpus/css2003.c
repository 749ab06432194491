extern int __VERIFIER_nondet_int(void);

int main() {
  int i = 1;
  int j = 1;
  int k = __VERIFIER_nondet_int();
  while (i < 1000) {
    i = i + 1;
    j = j + k;
    if (k > 0) {
      k = k - 1;
    } else {
      k = k + 1;
    }
  }
  j = j + i;
  i = j;
  k = 0;
  return 0;
}

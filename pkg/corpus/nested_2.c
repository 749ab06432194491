extern int __VERIFIER_nondet_int(void);

int main() {
  int i = 0;
  int j = 0;
  int k = 0;
  int n = __VERIFIER_nondet_int();
  while (i < n) {
    j = 0;
    while (j < n) {
      k = 0;
      while (k < n) {
        k = k + 1;
      }
      j = j + 1;
    }
    i = i + 1;
  }
  return 0;
}

extern int __VERIFIER_nondet_int(void);

int main() {
  int x = 0;
  int n = __VERIFIER_nondet_int();
  if (n < 0) {
    n = 0;
  } else {
    n = n + 1;
  }
  while (x < n) {
    x = x + 1;
  }
  n = x;
  return 0;
}

#include <assert.h>
extern int __VERIFIER_nondet_int(void);

int main() {
  int n = __VERIFIER_nondet_int();
  int sum = 0;
  int i = 1;
  if (n > 1000)
    n = 1000;
  while (i <= n) {
    sum = sum + i;
    i = i + 1;
  }
  int total = sum;
  assert(sum >= 0);
  return 0;
}

extern int __VERIFIER_nondet_int(void);

int main() {
  int x = 0;
  int y = __VERIFIER_nondet_int();
  for (int a = 0; a < 2; a++) {
    for (int b = 0; b < 2; b++) {
      for (int c = 0; c < 2; c++) {
        for (int d = 0; d < 2; d++) {
          for (int e = 0; e < 2; e++) {
            for (int f = 0; f < 2; f++) {
              if (x < y) {
                x = x + 1;
              } else {
                y = y + 1;
              }
            }
          }
        }
      }
    }
  }
  x = y;
  return 0;
}

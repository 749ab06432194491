int main() {
  int i = 0;
  while (i < 100) {
    i = i + 2;
  }
  return 0;
}

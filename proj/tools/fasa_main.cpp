#include <cstdio>

int main() {
  std::puts("fasa: subcommands not wired up yet");
  return 2;
}

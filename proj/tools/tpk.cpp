#include <iostream>

int main() {
  std::cout << "tpk: not yet wired\n";
  return 0;
}

// Regenerates the bundled planted-cue corpus. The file under data/ is a
// committed artifact; this exists so drift is a one-command fix:
//
//   ./build/make_planted data/planted_cue.jsonl

#include <fstream>
#include <iostream>

#include "support/planted.hpp"

int main(int argc, char** argv) {
  const char* path = argc > 1 ? argv[1] : "data/planted_cue.jsonl";
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return 1;
  }
  out << cueboot::planted::corpus_jsonl(cueboot::planted::default_seed);
  std::cout << "wrote " << path << "\n";
  return 0;
}

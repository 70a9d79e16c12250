// Writes the catalog structures shipped under assets/structures.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "foldskit/catalog.hpp"
#include "foldskit/dsl.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: foldskit_gen_assets ASSET_DIR\n";
    return 2;
  }
  std::filesystem::path dir = std::filesystem::path(argv[1]) / "structures";
  std::filesystem::create_directories(dir);
  for (const auto& [name, m] : folds::shipped_structures()) {
    auto path = dir / (name + ".fstr");
    std::ofstream out(path, std::ios::binary);
    out << "// Generated by foldskit_gen_assets from the catalog.\n" << folds::serialize(m);
    std::cout << path.string() << "\n";
  }
  return 0;
}

// Regenerates docs/equation_map.md from the per-module formula registrations.
// Usage: gen_equation_map [output-path]

#include <iostream>
#include <string>

#include "bridgekit/equation_map.hpp"
#include "bridgekit/textio.hpp"

int main(int argc, char** argv) {
    std::string out = argc > 1 ? argv[1] : "docs/equation_map.md";
    try {
        bridgekit::write_text_file(out, bridgekit::generate_equation_map());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    std::cout << "wrote " << out << '\n';
    return 0;
}

#include <cstdlib>
#include <iostream>
#include <string>

#include "synthetic_scene.hpp"

int main(int argc, char** argv) {
    if (argc < 3 || argc > 5) {
        std::cerr << "usage: speed-synth <out_dir> <count> [seed=1] [size=320]\n";
        return 2;
    }
    try {
        const std::size_t count = std::stoul(argv[2]);
        const std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 1;
        speed::synth::SceneOptions opts;
        if (argc > 4) {
            opts.width = opts.height = std::stoi(argv[4]);
        }
        speed::synth::write_corpus(argv[1], count, seed, opts);
        std::cout << "wrote " << count << " scenes to " << argv[1] << "\n";
    } catch (const std::exception& e) {
        std::cerr << "speed-synth: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

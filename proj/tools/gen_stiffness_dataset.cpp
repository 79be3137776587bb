// Regenerates data/stiffness_samples.csv (deterministic, seed 42).

#include <iostream>

#include "amsim/io.hpp"
#include "amsim/synthetic.hpp"

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : "data/stiffness_samples.csv";
    const auto samples = amsim::synthetic_stiffness_samples(42);
    amsim::write_stiffness_csv(path, samples);
    std::cout << "wrote " << samples.size() << " samples to " << path << "\n";
    return 0;
}

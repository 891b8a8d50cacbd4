#include "bbbd/cli.hpp"

int main(int argc, char** argv) {
    return bbbd::cli::run(argc, argv);
}

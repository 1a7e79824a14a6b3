#include "commands.hpp"

int main(int argc, char** argv) { return pano360::cli::run(argc, argv); }

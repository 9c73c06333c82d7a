#include <bagus/cli.hpp>

int main(int argc, char** argv) { return bagus::run_cli(argc, argv); }

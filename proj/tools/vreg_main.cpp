#include "vreg/cli_app.hpp"

int main(int argc, char** argv) { return vreg::run_cli(argc, argv); }

#include "bornlab/app/run.hpp"

int main(int argc, char** argv) { return bornlab::app::cli_main(argc, argv); }

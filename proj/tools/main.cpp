#include <iostream>

#include "socnav/cli.hpp"

int main(int argc, char** argv)
{
  return socnav::cli_main(argc, argv, std::cout, std::cerr);
}

#include <csignal>
#include <iostream>

#include "outage/cli.hpp"

namespace {

extern "C" void on_interrupt(int) { outage::interrupt_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  return outage::run_cli(argc, argv, std::cout, std::cerr);
}

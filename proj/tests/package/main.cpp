#include <trajzone/taxonomy.hpp>
#include <trajzone/vectorize.hpp>
#include <iostream>
int main() { std::cout << trajzone::variable_catalog().size() << " " << trajzone::to_string(trajzone::valid_combinations()[0]) << "\n"; }

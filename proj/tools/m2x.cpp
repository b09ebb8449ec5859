#include "m2x/search.hpp"
int main(){return 0;}

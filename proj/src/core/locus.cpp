#include "locus.hpp"

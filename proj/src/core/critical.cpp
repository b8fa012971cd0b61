#include "critical.hpp"

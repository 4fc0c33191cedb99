#pragma once

#include <string>

namespace oplab {

enum class Relation { GE, LE, EQ, INCOMPARABLE };

inline std::string to_string(Relation r) {
  switch (r) {
    case Relation::GE: return "GE";
    case Relation::LE: return "LE";
    case Relation::EQ: return "EQ";
    case Relation::INCOMPARABLE: return "INCOMPARABLE";
  }
  return "?";
}

}  // namespace oplab

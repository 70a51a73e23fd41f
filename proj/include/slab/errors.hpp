#pragma once

#include <stdexcept>
#include <string>

namespace slab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SLAB_DEFINE_ERROR(Name)        \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  };

SLAB_DEFINE_ERROR(DegenerateSimplex)
SLAB_DEFINE_ERROR(DimensionError)
SLAB_DEFINE_ERROR(RangeError)
SLAB_DEFINE_ERROR(OutOfBox)
SLAB_DEFINE_ERROR(DegenerateConfig)
SLAB_DEFINE_ERROR(PreconditionError)
SLAB_DEFINE_ERROR(ParamError)
SLAB_DEFINE_ERROR(OverflowError)
SLAB_DEFINE_ERROR(IOError)
SLAB_DEFINE_ERROR(ConfigError)

#undef SLAB_DEFINE_ERROR

}  // namespace slab

#pragma once

#include <stdexcept>
#include <string>

namespace rns {

// Base class for all typed runtime failures. The CLI maps SchemaError/IoError
// to exit code 2 (validation) and every other Error to exit code 3 (numerics).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define RNS_DEFINE_ERROR(Name)            \
  struct Name : Error {                   \
    using Error::Error;                   \
  }

RNS_DEFINE_ERROR(NonpositiveVolume);
RNS_DEFINE_ERROR(NonpositiveInternalEnergy);
RNS_DEFINE_ERROR(RootResidualTooLarge);
RNS_DEFINE_ERROR(AmbiguousBranch);
RNS_DEFINE_ERROR(GapViolation);
RNS_DEFINE_ERROR(NoFeasibleK);
RNS_DEFINE_ERROR(UnderResolved);
RNS_DEFINE_ERROR(CFLFailure);
RNS_DEFINE_ERROR(SingularConductivity);
RNS_DEFINE_ERROR(NoEnvelope);
RNS_DEFINE_ERROR(GridMismatch);
RNS_DEFINE_ERROR(VacuumApproached);
RNS_DEFINE_ERROR(NoContraction);
RNS_DEFINE_ERROR(StepSizeUnderflow);
RNS_DEFINE_ERROR(SmallnessLost);
RNS_DEFINE_ERROR(MissingDerivatives);
RNS_DEFINE_ERROR(InsufficientSpan);
RNS_DEFINE_ERROR(SchemaError);
RNS_DEFINE_ERROR(IoError);

#undef RNS_DEFINE_ERROR

}  // namespace rns

#pragma once

#include <stdexcept>
#include <string>

namespace ratebound {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define RATEBOUND_DEFINE_ERROR(NAME)                 \
    struct NAME : Error {                            \
        using Error::Error;                          \
        NAME() : Error(#NAME) {}                     \
    }

RATEBOUND_DEFINE_ERROR(DimensionMismatch);
RATEBOUND_DEFINE_ERROR(NonPositiveParameter);
RATEBOUND_DEFINE_ERROR(NonPositiveGain);
RATEBOUND_DEFINE_ERROR(PositiveRealPartEigenvalue);
RATEBOUND_DEFINE_ERROR(NotControllable);
RATEBOUND_DEFINE_ERROR(NotStabilizable);
RATEBOUND_DEFINE_ERROR(IllConditioned);
RATEBOUND_DEFINE_ERROR(InvalidOrder);
RATEBOUND_DEFINE_ERROR(OrderTooHigh);
RATEBOUND_DEFINE_ERROR(NonSmoothDescriptor);
RATEBOUND_DEFINE_ERROR(TooFewSamples);
RATEBOUND_DEFINE_ERROR(StepSizeUnderflow);
RATEBOUND_DEFINE_ERROR(Divergence);
RATEBOUND_DEFINE_ERROR(MissingJets);
RATEBOUND_DEFINE_ERROR(TuningFailed);
RATEBOUND_DEFINE_ERROR(NonConvergent);
RATEBOUND_DEFINE_ERROR(ZeroK2);
RATEBOUND_DEFINE_ERROR(ConfigError);

#undef RATEBOUND_DEFINE_ERROR

}  // namespace ratebound

#pragma once

#include <stdexcept>
#include <string>

namespace ggp {

// Every failure the library raises derives from Error, so callers (the CLI in
// particular) can map them onto exit codes in one place.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define GGP_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& what) : Error(what) {}  \
    }

GGP_DEFINE_ERROR(NonUnit);
GGP_DEFINE_ERROR(InvalidRing);
GGP_DEFINE_ERROR(SingularOverRing);
GGP_DEFINE_ERROR(DimensionTooLarge);
GGP_DEFINE_ERROR(NotCyclic);
GGP_DEFINE_ERROR(NotStable);
GGP_DEFINE_ERROR(BudgetExceeded);
GGP_DEFINE_ERROR(NotInProduct);
GGP_DEFINE_ERROR(PreconditionFailed);
GGP_DEFINE_ERROR(CharacteristicTwo);
GGP_DEFINE_ERROR(DegenerateInstance);
GGP_DEFINE_ERROR(NotInCongruenceSubgroup);
GGP_DEFINE_ERROR(NotStablePair);
GGP_DEFINE_ERROR(WitnessSearchFailed);
GGP_DEFINE_ERROR(ExtensionFailed);
GGP_DEFINE_ERROR(ConfigInvalid);

#undef GGP_DEFINE_ERROR

}  // namespace ggp

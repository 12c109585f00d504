#pragma once

#include <stdexcept>
#include <string>

namespace iwk1 {

// Every library failure carries a short kind tag so reports and the CLI can
// print a stable name without parsing what().
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define IWK1_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}         \
    };

// exactnum
IWK1_DEFINE_ERROR(DenominatorDivisible)
IWK1_DEFINE_ERROR(DivisionByZero)
IWK1_DEFINE_ERROR(ModulusMismatch)
// groupmodel
IWK1_DEFINE_ERROR(InvalidAction)
IWK1_DEFINE_ERROR(LevelTooSmall)
IWK1_DEFINE_ERROR(IllDefined)
IWK1_DEFINE_ERROR(ParseError)
// groupring
IWK1_DEFINE_ERROR(ModelMismatch)
IWK1_DEFINE_ERROR(NotAUnit)
IWK1_DEFINE_ERROR(BadDenominator)
// k1maps
IWK1_DEFINE_ERROR(NotInPsi)
IWK1_DEFINE_ERROR(InexactDivision)
IWK1_DEFINE_ERROR(DescentFailure)
// logk1
IWK1_DEFINE_ERROR(PrecisionExhausted)
IWK1_DEFINE_ERROR(NotInIdeal)
IWK1_DEFINE_ERROR(IntegralityFailure)
// phipsi
IWK1_DEFINE_ERROR(NotInPhi)
IWK1_DEFINE_ERROR(TooLarge)
// zeta
IWK1_DEFINE_ERROR(NonIntegralDelta)
IWK1_DEFINE_ERROR(NonAbelianTower)
IWK1_DEFINE_ERROR(LevelMismatch)

#undef IWK1_DEFINE_ERROR

}  // namespace iwk1

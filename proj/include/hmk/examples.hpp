#pragma once

#include <map>
#include <string>

#include "hmk/system.hpp"

namespace hmk {

struct DdeParams {
    double delta_timer = 1.0;
    double delta = 3.0;
    bool literal_jump = false;  // G = 2 x(-2,0) instead of 2 x(0,0)
};

struct EtcParams {
    double hs = 0.05;
    double hu = 0.05;
    double h = 0.1;       // delay bound, memory size is h + 1
    double k = 2.0;       // alpha(x) = -k x
    double sigma = 0.25;  // trigger threshold rho(x) = sigma |x|
};

struct DecayParams {
    double a = 1.0;
    double lj = 0.5;
    double period = 1.0;
};

// state (x, timer); x' = x(t-2) with the latest jump index, jumps double x
SystemData impulsive_dde(const DdeParams& p = {});
// state (x, u); x' = x + u(t-hu), u <- alpha(x(t-hs)) when the trigger fires
SystemData event_triggered(const EtcParams& p = {});
// state (x, timer); x' = -a x, x <- lj x once per period; memoryless
SystemData decay_system(const DecayParams& p = {});

// delayed affine template with a timer appended as the last coordinate:
// x' = A x(0) + B x(-d), x <- Jm x at timer = period
struct AffineParams {
    int n = 1;
    std::vector<std::vector<double>> A, B, Jm;
    double d = 0.0;
    double period = 1.0;
    double delta = -1.0;  // defaults to d
};
SystemData affine_delay(const AffineParams& p);

struct ExampleSpec {
    std::string name;
    std::map<std::string, double> params;
};

// "dde", "dde:delta_timer=1,delta=4", "etc:hs=0.05", "decay:a=1,lj=0.5"
ExampleSpec parse_example_spec(const std::string& text);
SystemData make_system(const ExampleSpec& spec);
SystemData make_system(const std::string& text);
// reads {"template":"affine", ...} from a JSON file
SystemData system_from_json_file(const std::string& path);

// constant history on [-delta, 0]: dde x=x0 timer=0, etc x=x0 u=alpha(x0),
// decay a single point (x0, 0)
HybridArc canonical_history(const SystemData& s, double x0 = 1.0);

}  // namespace hmk

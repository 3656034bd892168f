#include "robalt/datasets.hpp"

#include <map>

// Mirrors data/*.dat; a test keeps the two in sync.

namespace robalt {

namespace {

const std::string k_solar = R"dataset(# Solar lighting prototypes, simple step-stress temperature test.
# Temperature raised from 293 K to 353 K at 5 (hundred hours); test ended at 6
# with 4 devices still working. The first printed value, 10.14, lies past the
# end of the test although only 4 survivors are reported; it is read as 0.140.
name = solar
time_units = hundred hours
stress_units = K
n_total = 35
stress_levels = 293, 353
change_times = 5, 6
inspection_times = 1.5, 3, 5, 5.2, 5.4, 6
normalization = minmax
x0 = 293
mission_time = 4
quantile_level = 0.95
report_scale = 1
report_units = hundred hours
kind = failure_times
censored = removed
correct = 10.14 -> 0.140
---
10.14
0.783
1.324
1.582
1.716
1.794
1.883
2.293
2.660
2.674
2.725
3.085
3.924
4.396
4.612
4.892
5.002
5.022
5.082
5.112
5.147
5.238
5.244
5.247
5.305
5.337
5.407
5.408
5.445
5.483
5.717
)dataset";

const std::string k_transistor = R"dataset(# Medium power silicon bipolar transistors, ten-step temperature test, 168 h
# per step. Failures per step are given directly; the 4 right-censored units of
# the 31 on test are removed. Stress is mapped so the 25 C operating
# temperature is 0 and the lowest test level (120 C) is 1.
name = transistor
time_units = hours
stress_units = C
n_total = 31
stress_levels = 120, 140, 160, 180, 190, 200, 210, 220, 230, 240
change_times = 168, 336, 504, 672, 840, 1008, 1176, 1344, 1512, 1680
inspection_times = 168, 336, 504, 672, 840, 1008, 1176, 1344, 1512, 1680
normalization = anchors: 25 -> 0, 120 -> 1
x0 = 25
mission_time = 700800
quantile_level = 0.95
report_scale = 8760
report_units = years
kind = counts
censored = removed
---
0
0
0
2
5
5
3
3
0
9
)dataset";

const std::string k_led = R"dataset(# LEDs, four-step temperature test at 363, 413, 433 and 448 K with stress
# changes at 300, 500 and 600 hours and termination at 720 hours. 27 units on
# test, 23 failure times recorded; the 4 survivors are removed. Operating
# temperature is 50 C (323 K).
name = led
time_units = hours
stress_units = K
n_total = 27
stress_levels = 363, 413, 433, 448
change_times = 300, 500, 600, 720
inspection_times = 300, 500, 600, 720
normalization = minmax
x0 = 323
mission_time = 28800
quantile_level = 0.95
report_scale = 10000
report_units = 10^4 hours
kind = failure_times
censored = removed
---
347
397
432
491
512
567
574
588
597
603
605
615
633
634
637
644
653
675
684
699
706
718
720
)dataset";

const std::map<std::string, const std::string*>& table() {
    static const std::map<std::string, const std::string*> t = {{"solar", &k_solar}, {"transistor", &k_transistor}, {"led", &k_led}};
    return t;
}

}  // namespace

std::vector<std::string> builtin_dataset_names() { return {"solar", "transistor", "led"}; }

const std::string& builtin_dataset_text(const std::string& name) {
    const auto it = table().find(name);
    if (it == table().end()) throw DataError("unknown builtin dataset '" + name + "' (expected solar, transistor or led)");
    return *it->second;
}

}  // namespace robalt

#pragma once

#include <string>

namespace frontier {

// Calendar dates are carried as days since 1970-01-01 (can be negative).
using DayNumber = int;

DayNumber days_from_civil(int year, int month, int day);
void civil_from_days(DayNumber z, int& year, int& month, int& day);

// Parses "YYYY-MM-DD". Throws UserError on malformed input.
DayNumber parse_date(const std::string& iso);
std::string format_date(DayNumber d);

int year_of(DayNumber d);

// Fractional year, e.g. 2017-07-02 -> 2017.5 (by day-of-year position).
double year_fraction(DayNumber d);

}  // namespace frontier

#include "frontier/dates.hpp"

#include <cstdio>

#include "frontier/error.hpp"

namespace frontier {

// Howard Hinnant's civil-days algorithms (proleptic Gregorian).
DayNumber days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(DayNumber z, int& year, int& month, int& day) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  year = y + (month <= 2);
}

DayNumber parse_date(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3 ||
      m < 1 || m > 12 || d < 1 || d > 31) {
    throw UserError("bad date '" + iso + "' (expected YYYY-MM-DD)");
  }
  return days_from_civil(y, m, d);
}

std::string format_date(DayNumber dn) {
  int y, m, d;
  civil_from_days(dn, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

int year_of(DayNumber d) {
  int y, m, dd;
  civil_from_days(d, y, m, dd);
  return y;
}

double year_fraction(DayNumber d) {
  const int y = year_of(d);
  const DayNumber start = days_from_civil(y, 1, 1);
  const DayNumber next = days_from_civil(y + 1, 1, 1);
  return y + static_cast<double>(d - start) / static_cast<double>(next - start);
}

}  // namespace frontier

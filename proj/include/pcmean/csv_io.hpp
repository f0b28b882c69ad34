#ifndef PCMEAN_CSV_IO_HPP
#define PCMEAN_CSV_IO_HPP

#include <iosfwd>
#include <string>

#include "pcmean/fit.hpp"
#include "pcmean/inference.hpp"
#include "pcmean/types.hpp"

namespace pcm {

/// Reads long-format panel data with the exact header
/// `subject_id,time,count,z1,...,zd`. Rows may come in any order; they are
/// grouped by subject, sorted by time, checked for cumulative counts and
/// constant within-subject covariates, and duplicate times are collapsed
/// keeping the larger count. With `increments` set, the count column holds
/// per-interval counts and is cumulated after sorting.
Dataset parse_csv(std::istream& in, bool increments = false);

/// Writes a dataset back in the same schema (full double precision, so a
/// parse round-trips it exactly up to subject order).
void write_dataset_csv(const Dataset& data, std::ostream& out);

/// Machine-readable fit report: key-value lines for convergence, loglik and
/// per-coefficient estimates (with bootstrap se / z / p columns when `boot`
/// is given), followed by the (time, value) step table of the baseline mean.
std::string write_fit(const FitResult& result, const BootstrapResult* boot = nullptr);

}  // namespace pcm

#endif

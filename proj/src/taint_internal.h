#pragma once

#include <vector>

#include <seeker/taint.h>

namespace seeker::detail {

/// A store `b.F = s`: the fact's path is the tail below `F`, with empty base.
struct HeapWrite {
  FieldRef field;
  TaintFact tail;
};

struct FlowOut {
  std::vector<TaintFact> facts;
  std::vector<HeapWrite> heap;
};

/// Intraprocedural flow of one fact across one statement. `in == nullptr`
/// is the zero fact: it only generates sources.
void flow_fact(const IRStatement& statement,
               StmtRef at,
               const TaintFact* in,
               const Classification& classification,
               const TransferContext& context,
               FlowOut& out);

/// Local named by a call position, if the operand there is a local.
const std::string* local_at(const stmt::Invoke& call, CallPosition position);

} // namespace seeker::detail

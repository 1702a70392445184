#pragma once

#include <iosfwd>
#include <vector>

#include "mddkit/builders.hpp"
#include "mddkit/mdd.hpp"
#include "mddkit/solver.hpp"
#include "mddkit/types.hpp"

namespace mddkit::io {

// Line-oriented text formats. Blank lines and lines starting with '#' are
// skipped everywhere. Syntax problems throw ParseError with the offending
// line number; violated value ranges and malformed descriptors surface as
// ScopeError from the target type's own check.
//
//   table file:    `table <r>`, `domains <d1> ... <dr>`, one row per line
//   gcs file:      `gcs <r>`, `domains ...`, r lines `set <k> <v1> ... <vk>`
//   sequence file: gcs file, then `tmin <r values>` and `tmax <r values>`
//   seqset file:   `seqset <count>`, then that many sequence blocks
//   mdd file:      the canonical text form (`mdd 1 <r>`, domains, arcs)
//   problem file:  `problem <r>`, `domains ...`, per constraint
//                  `constraint <k> <vars>` plus an inline table/gcs/
//                  sequence/mdd block, then optional script events
//   script:        per event `delete_at <trigger> <constraint-index>` plus
//                  an inline table block

TupleTable read_table(std::istream& in);
builders::Gcs read_gcs(std::istream& in);
builders::TupleSequence read_sequence(std::istream& in);
std::vector<builders::TupleSequence> read_sequence_set(std::istream& in);
Mdd read_mdd(std::istream& in);
solver::Problem read_problem(std::istream& in);
std::vector<solver::DeletionEvent> read_script(std::istream& in);

void write_table(std::ostream& out, const TupleTable& table);
void write_gcs(std::ostream& out, const builders::Gcs& gcs);
void write_sequence(std::ostream& out, const builders::TupleSequence& seq);
void write_sequence_set(std::ostream& out, const std::vector<builders::TupleSequence>& seqs);
void write_mdd(std::ostream& out, const Mdd& mdd);

}  // namespace mddkit::io

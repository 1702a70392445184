#include "mddkit/mdd.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <sstream>
#include <unordered_map>

namespace mddkit {

// FNV-1a over the (label, child) pairs.
size_t SignatureHash::operator()(const Signature& sig) const {
  uint64_t h = 1469598103934665603ull;
  for (auto [v, c] : sig) {
    h = (h ^ static_cast<uint64_t>(static_cast<uint32_t>(v))) * 1099511628211ull;
    h = (h ^ static_cast<uint64_t>(static_cast<uint32_t>(c))) * 1099511628211ull;
  }
  return static_cast<size_t>(h);
}

Signature out_signature(const Mdd& m, NodeId n) {
  Signature sig;
  sig.reserve(m.out(n).size());
  for (const auto& a : m.out(n)) sig.emplace_back(a.label, a.child);
  return sig;
}

namespace {

using SigTable = std::unordered_map<Signature, NodeId, SignatureHash>;

}  // namespace

Mdd::Mdd(Scope scope) : scope_(std::move(scope)) {
  layers_.resize(scope_.arity() + 1);
  root_ = new_node(0);
  terminal_ = new_node(scope_.arity());
  reduced_ = true;  // the empty set is vacuously reduced
}

NodeId Mdd::child(NodeId n, Value label) const {
  int slot = out_slot(n, label);
  return slot < 0 ? kNoNode : nodes_[n].out[slot].child;
}

int Mdd::out_slot(NodeId n, Value label) const {
  const auto& out = nodes_[n].out;
  auto it = std::lower_bound(out.begin(), out.end(), label,
                             [](const OutArc& a, Value v) { return a.label < v; });
  if (it == out.end() || it->label != label) return -1;
  return static_cast<int>(it - out.begin());
}

NodeId Mdd::new_node(int layer) {
  NodeId id;
  if (!free_ids_.empty()) {
    id = free_ids_.back();
    free_ids_.pop_back();
    nodes_[id] = NodeRec{};
  } else {
    id = static_cast<NodeId>(nodes_.size());
    nodes_.emplace_back();
  }
  NodeRec& rec = nodes_[id];
  rec.layer = layer;
  rec.alive = true;
  rec.layer_slot = static_cast<int32_t>(layers_[layer].size());
  layers_[layer].push_back(id);
  ++node_count_;
  ++stats_.nodes_created;
  return id;
}

void Mdd::add_arc(NodeId parent, Value label, NodeId child) {
  NodeRec& p = nodes_[parent];
  NodeRec& c = nodes_[child];
  assert(p.alive && c.alive);
  assert(c.layer == p.layer + 1);
  assert(label >= 0 && label < scope_.domain_size(p.layer));
  auto it = std::lower_bound(p.out.begin(), p.out.end(), label,
                             [](const OutArc& a, Value v) { return a.label < v; });
  if (it != p.out.end() && it->label == label)
    throw std::logic_error("duplicate outgoing label on node");
  int slot = static_cast<int>(it - p.out.begin());
  p.out.insert(it, OutArc{label, child, static_cast<int32_t>(c.in.size())});
  // inserting shifted everything at slot+1.. one to the right
  for (size_t s = slot + 1; s < p.out.size(); ++s) {
    const OutArc& moved = p.out[s];
    nodes_[moved.child].in[moved.slot_in_child].slot_in_parent = static_cast<int32_t>(s);
  }
  c.in.push_back(InArc{parent, static_cast<int32_t>(slot)});
  ++arc_count_;
  ++stats_.arcs_created;
}

void Mdd::detach_in_entry(NodeId child, int in_slot) {
  NodeRec& c = nodes_[child];
  int last = static_cast<int>(c.in.size()) - 1;
  if (in_slot != last) {
    c.in[in_slot] = c.in[last];
    const InArc& moved = c.in[in_slot];
    nodes_[moved.parent].out[moved.slot_in_parent].slot_in_child = static_cast<int32_t>(in_slot);
  }
  c.in.pop_back();
}

void Mdd::remove_arc_at(NodeId parent, int slot) {
  NodeRec& p = nodes_[parent];
  assert(slot >= 0 && slot < static_cast<int>(p.out.size()));
  detach_in_entry(p.out[slot].child, p.out[slot].slot_in_child);
  p.out.erase(p.out.begin() + slot);
  for (size_t s = slot; s < p.out.size(); ++s) {
    const OutArc& moved = p.out[s];
    nodes_[moved.child].in[moved.slot_in_child].slot_in_parent = static_cast<int32_t>(s);
  }
  --arc_count_;
  ++stats_.arcs_deleted;
}

bool Mdd::remove_arc(NodeId parent, Value label) {
  int slot = out_slot(parent, label);
  if (slot < 0) return false;
  remove_arc_at(parent, slot);
  return true;
}

void Mdd::redirect_arc(NodeId parent, int slot, NodeId new_child) {
  NodeRec& p = nodes_[parent];
  OutArc& arc = p.out[slot];
  assert(nodes_[new_child].alive && nodes_[new_child].layer == p.layer + 1);
  detach_in_entry(arc.child, arc.slot_in_child);
  NodeRec& c = nodes_[new_child];
  arc.child = new_child;
  arc.slot_in_child = static_cast<int32_t>(c.in.size());
  c.in.push_back(InArc{parent, static_cast<int32_t>(slot)});
  // a retarget replaces one arc with another
  ++stats_.arcs_deleted;
  ++stats_.arcs_created;
}

void Mdd::move_in_arcs(NodeId from, NodeId to) {
  NodeRec& f = nodes_[from];
  NodeRec& t = nodes_[to];
  for (const InArc& ia : f.in) {
    nodes_[ia.parent].out[ia.slot_in_parent].child = to;
    nodes_[ia.parent].out[ia.slot_in_parent].slot_in_child = static_cast<int32_t>(t.in.size());
    t.in.push_back(ia);
    ++stats_.arcs_deleted;
    ++stats_.arcs_created;
  }
  f.in.clear();
}

void Mdd::free_node(NodeId n) {
  assert(n != root_ && n != terminal_);
  NodeRec& rec = nodes_[n];
  assert(rec.alive);
  while (!rec.out.empty()) remove_arc_at(n, static_cast<int>(rec.out.size()) - 1);
  while (!rec.in.empty()) {
    const InArc& ia = rec.in.back();
    remove_arc_at(ia.parent, ia.slot_in_parent);
  }
  std::vector<NodeId>& lay = layers_[rec.layer];
  int slot = rec.layer_slot;
  int last = static_cast<int>(lay.size()) - 1;
  if (slot != last) {
    lay[slot] = lay[last];
    nodes_[lay[slot]].layer_slot = slot;
  }
  lay.pop_back();
  rec.alive = false;
  free_ids_.push_back(n);
  --node_count_;
  ++stats_.nodes_deleted;
}

bool Mdd::contains(const Tuple& t) const {
  scope_.check_tuple(t);
  NodeId cur = root_;
  for (int i = 0; i < arity(); ++i) {
    cur = child(cur, t[i]);
    if (cur == kNoNode) return false;
  }
  return true;
}

unsigned long long Mdd::count_tuples() const {
  std::vector<unsigned long long> cnt(nodes_.size(), 0);
  cnt[terminal_] = 1;
  for (int l = arity() - 1; l >= 0; --l)
    for (NodeId n : layers_[l]) {
      unsigned long long c = 0;
      for (const OutArc& a : nodes_[n].out) c += cnt[a.child];
      cnt[n] = c;
    }
  return cnt[root_];
}

TupleTable Mdd::enumerate() const {
  TupleTable table;
  table.scope = scope_;
  table.sorted = true;
  Tuple cur(arity());
  // out-lists are label-sorted, so the walk emits in lexicographic order
  auto walk = [&](auto&& self, NodeId n, int depth) -> void {
    if (depth == arity()) {
      table.rows.push_back(cur);
      return;
    }
    for (const OutArc& a : nodes_[n].out) {
      cur[depth] = a.label;
      self(self, a.child, depth + 1);
    }
  };
  walk(walk, root_, 0);
  return table;
}

void Mdd::reduce() {
  for (int l = arity() - 1; l >= 1; --l) {
    SigTable table;
    table.reserve(layers_[l].size() * 2);
    std::vector<NodeId> snapshot = layers_[l];
    for (NodeId n : snapshot) {
      if (!nodes_[n].alive) continue;
      auto sig = out_signature(*this, n);
      auto [it, inserted] = table.emplace(std::move(sig), n);
      if (!inserted) {
        move_in_arcs(n, it->second);
        free_node(n);
      }
    }
  }
  reduced_ = true;
}

Mdd Mdd::complement() const {
  Mdd out(scope_);
  int r = arity();
  // universal[l]: node in `out` accepting every suffix from layer l
  std::vector<NodeId> universal(r + 1, kNoNode);
  universal[r] = out.terminal();
  auto get_universal = [&](int l) {
    for (int k = r - 1; k >= l; --k) {
      if (universal[k] != kNoNode) continue;
      NodeId u = out.new_node(k);
      for (Value v = 0; v < scope_.domain_size(k); ++v) out.add_arc(u, v, universal[k + 1]);
      universal[k] = u;
    }
    return universal[l];
  };
  // comp[n]: node of `out` accepting exactly the suffixes n rejects, or
  // kNoNode when n accepts every suffix.
  std::unordered_map<NodeId, NodeId> comp;
  auto rec = [&](auto&& self, NodeId n) -> NodeId {
    int l = nodes_[n].layer;
    if (l == r) return kNoNode;
    auto it = comp.find(n);
    if (it != comp.end()) return it->second;
    std::vector<std::pair<Value, NodeId>> arcs;
    const NodeRec& rec_n = nodes_[n];
    size_t k = 0;
    for (Value v = 0; v < scope_.domain_size(l); ++v) {
      if (k < rec_n.out.size() && rec_n.out[k].label == v) {
        NodeId cc = self(self, rec_n.out[k].child);
        if (cc != kNoNode) arcs.emplace_back(v, cc);
        ++k;
      } else {
        arcs.emplace_back(v, get_universal(l + 1));
      }
    }
    NodeId result = kNoNode;
    if (!arcs.empty()) {
      result = out.new_node(l);
      for (auto [v, c] : arcs) out.add_arc(result, v, c);
    }
    comp.emplace(n, result);
    return result;
  };
  NodeId croot = rec(rec, root_);
  if (croot != kNoNode) {
    // graft the computed arcs onto the real root and drop the placeholder
    for (const OutArc& a : out.nodes_[croot].out) out.add_arc(out.root(), a.label, a.child);
    out.free_node(croot);
  }
  out.reduce();
  return out;
}

ValidationReport Mdd::validate() const {
  ValidationReport rep;
  auto fail = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };
  int r = arity();
  if (!nodes_[root_].alive || nodes_[root_].layer != 0) fail("root missing from layer 0");
  if (!nodes_[terminal_].alive || nodes_[terminal_].layer != r) fail("terminal missing from layer r");
  if (layers_[0].size() != 1) fail("layer 0 must hold exactly the root");
  if (layers_[r].size() != 1) fail("layer r must hold exactly the terminal");

  size_t nodes_seen = 0, arcs_seen = 0;
  bool empty_set = nodes_[root_].out.empty();
  for (int l = 0; l <= r; ++l) {
    for (size_t slot = 0; slot < layers_[l].size(); ++slot) {
      NodeId n = layers_[l][slot];
      const NodeRec& rec = nodes_[n];
      ++nodes_seen;
      if (!rec.alive) fail("dead node " + std::to_string(n) + " in layer registry");
      if (rec.layer != l || rec.layer_slot != static_cast<int>(slot))
        fail("layer bookkeeping broken at node " + std::to_string(n));
      if (n != root_ && rec.in.empty() && !(n == terminal_ && empty_set))
        fail("node " + std::to_string(n) + " has no incoming arc");
      if (n != terminal_ && rec.out.empty() && !(n == root_ && empty_set))
        fail("node " + std::to_string(n) + " has no outgoing arc");
      if (empty_set && n != root_ && n != terminal_)
        fail("arc-less root with extra node " + std::to_string(n));
      Value prev = -1;
      for (size_t s = 0; s < rec.out.size(); ++s) {
        const OutArc& a = rec.out[s];
        ++arcs_seen;
        if (a.label <= prev) fail("out-list of node " + std::to_string(n) + " not strictly sorted");
        prev = a.label;
        if (a.label < 0 || a.label >= scope_.domain_size(l))
          fail("label outside domain at node " + std::to_string(n));
        const NodeRec& c = nodes_[a.child];
        if (!c.alive || c.layer != l + 1)
          fail("arc from node " + std::to_string(n) + " skips a layer or hits a dead node");
        else if (c.in[a.slot_in_child].parent != n ||
                 c.in[a.slot_in_child].slot_in_parent != static_cast<int>(s))
          fail("in/out cross-links broken at node " + std::to_string(n));
      }
    }
  }
  if (nodes_seen != node_count_) fail("node count out of sync");
  if (arcs_seen != arc_count_) fail("arc count out of sync");

  if (reduced_) {
    for (int l = 1; l < r; ++l) {
      SigTable table;
      for (NodeId n : layers_[l]) {
        auto sig = out_signature(*this, n);
        auto [it, inserted] = table.emplace(std::move(sig), n);
        if (!inserted)
          fail("reduced flag set but nodes " + std::to_string(n) + " and " +
               std::to_string(it->second) + " are equivalent");
      }
    }
  }
  return rep;
}

std::string Mdd::to_canonical_text() const {
  int r = arity();
  std::vector<int32_t> number(nodes_.size(), -1);
  number[root_] = 0;
  number[terminal_] = 1;
  int32_t next = 2;
  std::vector<std::vector<NodeId>> by_layer(r + 1);
  by_layer[0].push_back(root_);
  auto visit = [&](auto&& self, NodeId n) -> void {
    for (const OutArc& a : nodes_[n].out) {
      if (number[a.child] == -1) {
        number[a.child] = next++;
        by_layer[nodes_[a.child].layer].push_back(a.child);
        self(self, a.child);
      }
    }
  };
  visit(visit, root_);

  std::ostringstream os;
  os << "mdd 1 " << r << "\n";
  os << "domains";
  for (int d : scope_.domain_sizes()) os << " " << d;
  os << "\n";
  for (int l = 0; l < r; ++l)
    for (NodeId n : by_layer[l])
      for (const OutArc& a : nodes_[n].out)
        os << "arc " << number[n] << " " << a.label << " " << number[a.child] << "\n";
  return os.str();
}

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

long parse_int(std::string_view tok, int line) {
  long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line, "expected integer, got '" + std::string(tok) + "'");
  return v;
}

}  // namespace

Mdd Mdd::from_canonical_text(std::string_view text) {
  int line_no = 0;
  size_t pos = 0;
  auto next_line = [&](std::string_view& out) {
    while (pos < text.size()) {
      size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view ln = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!split_ws(ln).empty()) {
        out = ln;
        return true;
      }
    }
    return false;
  };

  std::string_view ln;
  if (!next_line(ln)) throw ParseError(1, "empty input");
  auto head = split_ws(ln);
  if (head.size() != 3 || head[0] != "mdd" || head[1] != "1")
    throw ParseError(line_no, "expected header 'mdd 1 <arity>'");
  int r = static_cast<int>(parse_int(head[2], line_no));
  if (r < 1) throw ParseError(line_no, "arity must be at least 1");

  if (!next_line(ln)) throw ParseError(line_no, "missing domains line");
  auto dom = split_ws(ln);
  if (dom.size() != static_cast<size_t>(r) + 1 || dom[0] != "domains")
    throw ParseError(line_no, "expected 'domains' with one size per variable");
  std::vector<int> sizes;
  for (int i = 1; i <= r; ++i) {
    long d = parse_int(dom[i], line_no);
    if (d < 1) throw ParseError(line_no, "domain sizes must be positive");
    sizes.push_back(static_cast<int>(d));
  }

  Mdd m{Scope(sizes)};
  std::unordered_map<long, NodeId> ids;
  ids[0] = m.root();
  ids[1] = m.terminal();
  while (next_line(ln)) {
    auto tok = split_ws(ln);
    if (tok[0] != "arc" || tok.size() != 4) throw ParseError(line_no, "expected 'arc <src> <label> <dst>'");
    long src = parse_int(tok[1], line_no);
    long label = parse_int(tok[2], line_no);
    long dst = parse_int(tok[3], line_no);
    auto sit = ids.find(src);
    if (sit == ids.end()) throw ParseError(line_no, "arc source never introduced");
    NodeId s = sit->second;
    int l = m.layer_of(s);
    if (label < 0 || label >= m.scope().domain_size(l))
      throw ParseError(line_no, "label outside the domain of this layer");
    NodeId d;
    auto dit = ids.find(dst);
    if (dit == ids.end()) {
      if (l + 1 == r) throw ParseError(line_no, "last-layer arc must end at node 1");
      d = m.new_node(l + 1);
      ids[dst] = d;
    } else {
      d = dit->second;
      if (m.layer_of(d) != l + 1) throw ParseError(line_no, "arc endpoint on wrong layer");
    }
    if (m.child(s, static_cast<Value>(label)) != kNoNode)
      throw ParseError(line_no, "duplicate label on one node");
    m.add_arc(s, static_cast<Value>(label), d);
  }

  ValidationReport rep = m.validate();
  if (!rep.ok()) throw ParseError(line_no, "structure invalid: " + rep.violations.front());

  // detect reducedness so the flag reflects the loaded structure
  m.set_reduced(true);
  for (int l = r - 1; l >= 1 && m.is_reduced(); --l) {
    SigTable table;
    for (NodeId n : m.layer(l))
      if (!table.emplace(out_signature(m, n), n).second) {
        m.set_reduced(false);
        break;
      }
  }
  return m;
}

bool equivalent(const Mdd& a, const Mdd& b) {
  if (a.scope() != b.scope()) throw ScopeError("equivalence needs matching scopes");
  Mdd ca = a;
  Mdd cb = b;
  ca.reduce();
  cb.reduce();
  return ca.to_canonical_text() == cb.to_canonical_text();
}

}  // namespace mddkit

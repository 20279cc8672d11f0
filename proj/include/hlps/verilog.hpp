// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hlps/ir.hpp"

/// Structural Verilog subset: module headers (ANSI and non-ANSI), port and
/// net declarations, named-connection instantiations and constant
/// parameters. Everything else (assign, always, generate, functions...) is
/// kept verbatim as residual text and only scanned for identifiers.
namespace hlps::verilog {

class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& what);
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

struct Span {
  size_t begin = 0;
  size_t end = 0;
  size_t size() const { return end - begin; }
};

enum class SegmentKind { header, port_decl, wire_decl, instantiation, residual, end };

struct Segment {
  SegmentKind kind;
  Span span;
};

struct NetDecl {
  std::string name;
  int width = 1;
};

struct NamedConnection {
  std::string port;
  std::string expr;  // raw expression text, empty for `.port()`
  Span expr_span;    // location of `expr` (empty span for `.port()`)
  bool implicit = false;  // `.port` shorthand
};

struct Instantiation {
  std::string module_name;
  std::string instance_name;
  std::string parameters;  // raw `#(...)` text, empty when absent
  std::vector<NamedConnection> connections;
  bool positional = false;
  Span span;  // whole statement including ';'
  int line = 0;

  const NamedConnection* find(std::string_view port) const;
};

/// One residual item (or instantiation) with the signal identifiers it
/// references. Pure assigns (`assign a = b;`) keep their two sides.
struct Statement {
  enum class Kind { assign, block, declaration, instantiation, other };
  Kind kind = Kind::other;
  Span span;
  std::vector<std::string> identifiers;
  std::string lhs;  // set for pure identifier-to-identifier assigns
  std::string rhs;
  bool pure() const { return !lhs.empty(); }
};

struct ParsedModule {
  std::string name;
  std::string text;  // the module unit this was parsed from
  std::vector<Port> ports;
  bool ansi = true;
  std::vector<NetDecl> nets;
  std::vector<Instantiation> instantiations;
  std::vector<Statement> statements;
  /// Contiguous, ordered cover of `text`.
  std::vector<Segment> segments;
  std::map<std::string, long long> parameters;
  /// Every identifier token in the unit, sorted and unique.
  std::vector<std::string> identifiers;

  Span header;                   // `module ... ;`
  Span name_span;                // module name token
  size_t port_list_open = npos;  // offset of '(' of the port list
  size_t port_list_close = npos; // offset of ')' of the port list
  size_t port_list_last = npos;  // end of the last token before ')'
  size_t endmodule = 0;          // offset of the `endmodule` keyword
  int header_line = 1;

  static constexpr size_t npos = static_cast<size_t>(-1);

  const Port* find_port(std::string_view port) const;
  const Instantiation* find_instance(std::string_view inst) const;
  /// Text of all residual segments concatenated.
  std::string residual_text() const;
};

/// A comment extracted by the lexer (`//` comments honour `\` continuation).
struct Comment {
  std::string text;  // without the comment markers, continuations joined
  Span span;
  int line = 0;
};

/// Parses every module in `source`. Offsets are relative to each module's
/// unit: the text from the end of the previous `endmodule` (or the start of
/// the file) through this module's `endmodule`; the last unit also keeps any
/// trailing text. Concatenating the units reproduces `source`.
std::vector<ParsedModule> parse_source(std::string_view source);

/// Parses a single-module unit.
ParsedModule parse_module(std::string_view unit);

/// All comments in `source`, in order.
std::vector<Comment> comments(std::string_view source);

/// One leaf module per module in `source`; `source` of each leaf is its unit.
std::vector<Module> import_leaf(std::string_view source);

/// Parses a leaf's Verilog source.
ParsedModule extract_instantiations(const Module& leaf);

/// Lifts a purely structural leaf (only declarations and instantiations with
/// identifier/constant connections) into a grouped module.
Module lift_structural(const Module& leaf);

/// Evaluates a constant expression over known parameters.
long long eval_constant(std::string_view expr, const std::map<std::string, long long>& params);

/// Accumulates non-overlapping text edits against a parsed module.
class Rewriter {
 public:
  explicit Rewriter(const ParsedModule& parsed);

  void rename_module(const std::string& new_name);
  void add_ports(const std::vector<Port>& ports);
  void add_wire(const std::string& name, int width);
  void add_assign(const std::string& lhs, const std::string& rhs);
  void remove_instance(const std::string& instance_name);
  void replace_connection(const std::string& instance_name, const std::string& port,
                          const std::string& new_expr);
  /// Reserves an identifier so later fresh names avoid it.
  void reserve(const std::string& name) { taken_.push_back(name); }
  /// Identifier not used anywhere in the module text or reserved.
  std::string fresh(const std::string& base);

  std::string str() const;

 private:
  struct Edit {
    size_t begin;
    size_t end;
    std::string text;
    int order;
  };
  void edit(size_t begin, size_t end, std::string text);

  const ParsedModule& parsed_;
  std::vector<Edit> edits_;
  std::vector<std::string> new_port_decls_;
  std::vector<std::string> new_port_names_;
  std::vector<std::string> new_wires_;
  std::vector<std::string> new_assigns_;
  std::vector<std::string> taken_;
  std::string new_name_;
  int order_ = 0;
};

/// Module text with `new_ports` added to the header. Empty list: unchanged.
std::string rewrite_add_ports(const ParsedModule& parsed, const std::vector<Port>& new_ports);

/// Adds `port` and ties it to `expr` with an assign in the port's direction
/// (`assign port = expr;` for outputs, `assign expr = port;` for inputs).
std::string rewrite_route_to_port(const ParsedModule& parsed, const std::string& expr,
                                  const Port& port);

/// Externalizes one instantiation connection through a new port: the
/// connection is rewritten to a fresh wire `w_<port>` which is tied to the
/// new port. Constant connections are left in place and return the text
/// unchanged.
std::string rewrite_externalize_connection(const ParsedModule& parsed,
                                           const std::string& instance_name,
                                           const std::string& instance_port,
                                           const Port& new_port);

std::string declaration(const Port& port);
std::string range(int width);  // "[w-1:0] " or "" for width 1

}  // namespace hlps::verilog

#include <sstream>

#include "flucid/parser.hpp"

namespace flucid {

namespace {

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

bool atomic(const Node& n) {
  switch (n.kind) {
    case NodeKind::literal:
      // negative numbers need parentheses to survive as operands
      return !((n.literal.is_int() && n.literal.as_int() < 0) ||
               (n.literal.is_real() && n.literal.as_real() < 0));
    case NodeKind::no_obs:
    case NodeKind::zero_obs:
    case NodeKind::ident:
    case NodeKind::hash:
    case NodeKind::call:
    case NodeKind::subscript:
    case NodeKind::dot:
    case NodeKind::if_expr:
    case NodeKind::bracket:
    case NodeKind::brace:
    case NodeKind::tuple:
    case NodeKind::angle:
    case NodeKind::select:
    case NodeKind::embed:
    case NodeKind::box: return true;
    default: return false;
  }
}

// a where-expression around a call would read back as a function declaration
bool needs_statement_parens(const Node& e) {
  return e.kind == NodeKind::where && e.kids[0] &&
         (e.kids[0]->kind == NodeKind::call || e.kids[0]->kind == NodeKind::subscript);
}

class Printer {
 public:
  std::string program(const Node& p) {
    std::string out;
    for (const auto& d : p.decls) out += decl(*d, 0) + "\n";
    if (!p.kids.empty()) out += statement_expr(*p.kids[0], 0) + "\n";
    return out;
  }

  std::string expr(const Node& n, int ind) {
    switch (n.kind) {
      case NodeKind::literal: return to_source(n.literal);
      case NodeKind::no_obs: return "$";
      case NodeKind::zero_obs: return n.text + (n.kids.empty() ? "" : "(" + expr(*n.kids[0], ind) + ")");
      case NodeKind::ident: return n.text;
      case NodeKind::hash:
        if (n.kids.empty()) return "#";
        if (n.has(flag_dotted)) return "#." + operand(*n.kids[0], ind);
        return "#" + n.kids[0]->text;
      case NodeKind::unary: {
        std::string op = n.text + (n.dim.empty() ? "" : "." + n.dim);
        if (n.text == "bel" || n.text == "pl") {
          std::vector<std::string> args;
          for (const auto& k : n.kids) args.push_back(element(*k, ind));
          return op + "(" + join(args, ", ") + ")";
        }
        if (n.text == "-" || n.text == "!") return op + operand(*n.kids[0], ind);
        return op + " " + operand(*n.kids[0], ind);
      }
      case NodeKind::binary: {
        std::string op = n.text + (n.dim.empty() ? "" : "." + n.dim);
        return operand(*n.kids[0], ind) + " " + op + " " + operand(*n.kids[1], ind);
      }
      case NodeKind::call: {
        std::vector<std::string> args;
        for (std::size_t i = 1; i < n.kids.size(); ++i) args.push_back(element(*n.kids[i], ind));
        return operand(*n.kids[0], ind) + "(" + join(args, ", ") + ")";
      }
      case NodeKind::subscript: {
        std::vector<std::string> idx;
        for (std::size_t i = 1; i < n.kids.size(); ++i) idx.push_back(expr(*n.kids[i], ind));
        return operand(*n.kids[0], ind) + "[" + join(idx, ", ") + "]";
      }
      case NodeKind::dot: return operand(*n.kids[0], ind) + "." + n.text;
      case NodeKind::if_expr: {
        std::string out = "if " + expr(*n.kids[0], ind) + " then " + expr(*n.kids[1], ind);
        if (n.kids.size() > 2) out += " else " + expr(*n.kids[2], ind);
        return out + " fi";
      }
      case NodeKind::where: {
        std::string pad(static_cast<std::size_t>(ind), ' ');
        std::string out = expr(*n.kids[0], ind) + "\n" + pad + "where\n";
        for (const auto& d : n.decls) out += decl(*d, ind + 2) + "\n";
        return out + pad + "end";
      }
      case NodeKind::bracket: {
        std::vector<std::string> items;
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          if (n.names[i].empty()) {
            const Node& k = *n.kids[i];
            items.push_back(k.kind == NodeKind::annot ? "(" + expr(k, ind) + ")" : expr(k, ind));
          } else {
            items.push_back(n.names[i] + (n.seps[i] == '>' ? " => " : ":") + expr(*n.kids[i], ind));
          }
        }
        return "[" + join(items, ", ") + "]";
      }
      case NodeKind::brace: return "{" + elements(n.kids, 0, ind) + "}";
      case NodeKind::tuple: return "(" + elements(n.kids, 0, ind) + ")";
      case NodeKind::angle: {
        std::vector<std::string> items;
        for (std::size_t i = 1; i < n.kids.size(); ++i) items.push_back(operand(*n.kids[i], ind));
        return operand(*n.kids[0], ind) + "<" + join(items, ", ") + ">";
      }
      case NodeKind::annot: return expr(*n.kids[0], ind) + " => " + expr(*n.kids[1], ind);
      case NodeKind::select: return "select(" + elements(n.kids, 0, ind) + ")";
      case NodeKind::embed: return "embed(" + elements(n.kids, 0, ind) + ")";
      case NodeKind::box: {
        std::vector<std::string> dims;
        for (std::size_t i = 0; i + 1 < n.kids.size(); ++i) dims.push_back(expr(*n.kids[i], ind));
        return "Box[" + join(dims, ", ") + " | " + expr(*n.kids.back(), ind) + "]";
      }
      case NodeKind::program: return program(n);
      default: return decl(n, ind);
    }
  }

  std::string decl(const Node& n, int ind) {
    std::string pad(static_cast<std::size_t>(ind), ' ');
    switch (n.kind) {
      case NodeKind::dim_decl: {
        std::string out = pad + "dimension " + join(n.names, ", ");
        if (n.has(flag_has_spec)) {
          out += " :";
          for (const auto& m : n.mods) out += " " + m;
          if (n.has(flag_range)) {
            out += " {" + expr(*n.kids[0], ind) + " to " + expr(*n.kids[1], ind);
            if (n.has(flag_step)) out += " step " + expr(*n.kids[2], ind);
            out += "}";
          } else if (n.has(flag_equals)) {
            out += " = " + expr(*n.kids[0], ind);
          } else {
            out += " {" + elements(n.kids, 0, ind) + "}";
          }
        }
        return out + ";";
      }
      case NodeKind::id_decl: return pad + n.text + " = " + expr(*n.kids[0], ind) + ";";
      case NodeKind::func_decl: {
        std::string out = pad + n.text;
        if (n.has(flag_has_dparams)) out += "[" + join(n.dparams, ", ") + "]";
        if (n.has(flag_has_params)) out += "(" + join(n.params, ", ") + ")";
        if (!n.has(flag_where_form)) return out + " = " + expr(*n.kids[0], ind) + ";";
        out += "\n" + pad + "where\n";
        for (const auto& d : n.decls) out += decl(*d, ind + 2) + "\n";
        if (!n.kids.empty())
          out += std::string(static_cast<std::size_t>(ind + 2), ' ') + statement_expr(*n.kids[0], ind + 2) + ";\n";
        return out + pad + "end;";
      }
      case NodeKind::obs_decl: {
        std::string out = pad;
        if (n.has(flag_statement))
          out += "evidential statement ";
        else if (n.has(flag_sequence))
          out += "observation sequence ";
        else
          out += "observation ";
        for (const auto& m : n.mods) out += m + " ";
        out += n.text;
        if (!n.kids.empty()) out += " = " + expr(*n.kids[0], ind);
        return out + ";";
      }
      default: return pad + expr(n, ind) + ";";
    }
  }

 private:
  std::string statement_expr(const Node& e, int ind) {
    return needs_statement_parens(e) ? "(" + expr(e, ind) + ")" : expr(e, ind);
  }
  std::string operand(const Node& n, int ind) { return atomic(n) ? expr(n, ind) : "(" + expr(n, ind) + ")"; }
  std::string element(const Node& n, int ind) { return expr(n, ind); }
  std::string elements(const std::vector<NodePtr>& ks, std::size_t from, int ind) {
    std::vector<std::string> items;
    for (std::size_t i = from; i < ks.size(); ++i) items.push_back(element(*ks[i], ind));
    return join(items, ", ");
  }
};

}  // namespace

std::string pretty_print(const Node& tree) {
  Printer p;
  if (tree.kind == NodeKind::program) return p.program(tree);
  return p.expr(tree, 0);
}

}  // namespace flucid

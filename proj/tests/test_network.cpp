#include <fstream>

#include "doctest.h"
#include "tpanet/cli.hpp"
#include "tpanet/network.hpp"

using namespace tpanet;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    (void)parse_network(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("parsed: " << text);
  return ErrorCode::Configuration;
}

const char* kToggle = R"(
alphabet a b;
automaton T {
  sig in(x) out(i) hid(h);
  state idle start;
  state busy;
  trans idle -> busy on x:<a> out i:<a> hid h:<b>;
  trans idle -> idle on x:<b> out i:<>;
  trans idle -> idle on x:<>;
  trans busy -> idle on x:<a> out i:<>;
  trans busy -> idle on x:<b> out i:<b>;
  trans busy -> busy on x:<>;
  bound 1;
}
builtin FM = fair_merge;
builtin B = buffer(4);
rename B.i -> o;
rename B.o -> q;
net top = hide {i} (T (x) FM);
net all = top (x) B;
input { t0 x:<a> j:<b>; t1 x:<> j:<>; }
config horizon 2 seed 5 budget 100000;
)";

}  // namespace

TEST_CASE("parsing a description") {
  auto net = parse_network(kToggle);
  CHECK(net.alphabet.size() == 2);
  REQUIRE(net.automata.size() == 3);
  CHECK(net.automata[0].table->transitions.size() == 6);
  CHECK(net.nets.size() == 2);
  CHECK(render(net.nets[0].expr) == "hide {i} (T (x) FM)");
  CHECK(net.input->size() == 2);
  CHECK(*net.config.seed == 5);

  auto fm = resolve_automaton(net, "FM");
  CHECK(render(fm.signature()) == "(D={a,b}, I={i,j}, O={o}, H={})");
  auto sig = signature_of(net, net.nets[1].expr);
  CHECK(sig.inputs == ChannelSet{"j", "x"});
  CHECK(sig.outputs == ChannelSet{"o", "q"});
}

TEST_CASE("render and parse round trip") {
  auto net = parse_network(kToggle);
  auto again = parse_network(render(net));
  CHECK(again == net);
  CHECK(render(again) == render(net));
}

TEST_CASE("parse errors carry positions") {
  try {
    (void)parse_network("alphabet a;\nbuiltin FM = fair_merge\nnet n = FM;");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(std::string(e.what()).find("3:1") != std::string::npos);
  }
  CHECK(parse_error("alphabet a; net n = X;") == ErrorCode::NameError);
  CHECK(parse_error("alphabet a; builtin F = fair_merge; net n = hide {i} F;") ==
        ErrorCode::TypeError);
  CHECK(parse_error("alphabet a; builtin F = fair_merge; builtin G = fair_merge; net n = F (x) G;") ==
        ErrorCode::TypeError);
  CHECK(parse_error("alphabet a; builtin F = nosuch;") == ErrorCode::NameError);
  CHECK(parse_error("alphabet a; automaton A { sig in(i) out(o); state s start; trans s -> t; }") ==
        ErrorCode::NameError);
  CHECK(parse_error("alphabet a; automaton A { sig in(i) out(i); state s start; }") ==
        ErrorCode::TypeError);
  CHECK(parse_error("alphabet a; input { t1 i:<a>; }") == ErrorCode::SyntaxError);
  CHECK(parse_error("alphabet a; @") == ErrorCode::SyntaxError);
}

TEST_CASE("a missing transition parses and check reports it") {
  const char* text = R"(alphabet a;
automaton P { sig in(i) out(o); state s start; trans s -> s on i:<> out o:<>; }
)";
  CHECK_NOTHROW(parse_network(text));
  auto v = run_command_on_text("check", {text});
  CHECK(v.status == Verdict::Status::Witness);
  CHECK(v.exit_code == 1);
  CHECK(v.text.find("reactive: not reactive: state=s input=i:<a>") != std::string::npos);
}

TEST_CASE("commands") {
  auto compose_v = run_command_on_text(
      "compose", {"alphabet a; builtin A = blocking_a; builtin B = blocking_b; net n = A (x) B;"});
  CHECK(compose_v.exit_code == 1);
  CHECK(compose_v.text.find("EMPTY-COMPOSITION at state=(s1,s2)") != std::string::npos);

  CommandOptions seeded;
  seeded.seed = 1;
  const char* fm = "alphabet a b; builtin FM = fair_merge; input { t0 i:<a> j:<b>; }";
  auto r1 = run_command_on_text("run", {fm}, seeded);
  auto r2 = run_command_on_text("run", {fm}, seeded);
  CHECK(r1.exit_code == 0);
  CHECK(r1.render(true) == r2.render(true));
  CHECK(r1.render(false) == r2.render(false));

  auto equiv = run_command_on_text(
      "equiv", {"alphabet a; builtin FM = fair_merge; builtin B = buffer; rename B.i -> o;"
                "rename B.o -> j; net n = FM (x) B; config horizon 2;"});
  CHECK(equiv.exit_code == 0);
  CHECK(equiv.text.rfind("EQUIVALENT", 0) == 0);

  auto behs = run_command_on_text("behaviors", {kToggle}, CommandOptions{1, {}, {}, {}, "T"});
  CHECK(behs.exit_code == 0);
  CHECK(behs.text.find("# 3 behaviors") != std::string::npos);

  auto dist = run_command_on_text("dist", {"t=0 i:<a>\nt=1 i:<>\n", "t=0 i:<a>\nt=1 i:<b>\n"});
  CHECK(dist.text == "distance: exact 2^-1\n");

  auto budget = run_command_on_text("behaviors", {kToggle}, CommandOptions{3, {}, {}, 5, "all"});
  CHECK(budget.exit_code == 3);
  CHECK(run_command_on_text("check", {"alphabet a; net x = ;"}).exit_code == 2);
  CHECK(run_command_on_text("frobnicate", {kToggle}).exit_code == 2);
  CHECK(run_command("check", {"/nonexistent/file"}).exit_code == 2);
}

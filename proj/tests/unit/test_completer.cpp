#include <doctest.h>

#include "completer/backend.hpp"
#include "completer/oracle.hpp"
#include "completer/parser.hpp"
#include "completer/prompt.hpp"
#include "world/generator.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace taskgrid;
using namespace taskgrid::completer;
using world::Category;
using world::SubgoalAction;

namespace {

const std::string kData = TASKGRID_TEST_DATA;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Golden files are frozen; TASKGRID_UPDATE_GOLDEN=1 rewrites them.
void check_golden(const std::string& name, const std::string& text) {
    const std::string path = kData + "/golden/" + name;
    if (std::getenv("TASKGRID_UPDATE_GOLDEN")) std::ofstream(path, std::ios::binary) << text;
    CHECK(slurp(path) == text);
}

std::vector<std::string> names(std::span<const Category> cats) {
    std::vector<std::string> out;
    for (Category c : cats) out.emplace_back(world::name(c));
    return out;
}

const std::vector<std::string>& kitchen() {
    static const auto v = names(world::possible_landmarks(world::RoomType::Kitchen));
    return v;
}

Subgoal sg(SubgoalAction a, Category c) { return {a, c, std::nullopt, -1}; }

// Scene built by hand: open floor with the listed objects.
world::GridScene tiny_scene() {
    world::GridScene s;
    s.width = s.height = 6;
    s.wall.assign(36, false);
    s.spawn.cell = {4, 3};
    return s;
}

world::ObjectId add(world::GridScene& s, Category c, world::Cell cell, std::optional<world::ObjectId> in = {}) {
    world::ObjectInstance o;
    o.id = static_cast<world::ObjectId>(s.objects.size());
    o.category = c;
    o.cell = cell;
    o.contained_in = in;
    s.objects.push_back(o);
    return o.id;
}

} // namespace

TEST_CASE("rendered prompts match the golden files") {
    const auto [scene, task] = world::generate_scene(3, world::RoomType::Kitchen, true);
    TaskProgress p;
    p.all = world::parse_instructions(task.step_instructions);
    p.current = p.all.front();
    const auto b = build_prompt(Templates::defaults(), task, p, {"CounterTop", "StoveBurner"}, kitchen(), "");
    check_golden("kitchen_system.txt", b.system_message);
    check_golden("kitchen_agent.txt", b.agent_message);
    CHECK(b.agent_message.find("\nLast message: None") != std::string::npos);
    CHECK(b.agent_message.find("Observed landmarks: ['CounterTop', 'StoveBurner']") != std::string::npos);
    CHECK(build_prompt(Templates::defaults(), task, p, {"CounterTop", "StoveBurner"}, kitchen(), "") == b);

    p.completed = {p.all.front()};
    p.current = p.all.at(1);
    const auto b2 = build_prompt(Templates::defaults(), task, p, {"Cabinet"}, kitchen(), "PickupObject failed: Mug is not visible");
    check_golden("kitchen_agent_failure.txt", b2.agent_message);
    CHECK(prompt_hash(b2) != prompt_hash(b));
    CHECK(prompt_hash(b).size() == 64);
}

TEST_CASE("system message carries every component") {
    const auto& t = Templates::defaults();
    const auto b = build_prompt(t, {}, {}, {}, {}, "");
    for (const char* needle : {"household assistant robot", "Last message", "GotoLocation <Object>", "PickupObject",
                               "Reason:", "Plan:", "must always be the current subgoal"}) {
        CAPTURE(needle);
        CHECK(b.system_message.find(needle) != std::string::npos);
    }
    for (const char* needle : {"Goal:", "Step-by-step instructions:", "Possible landmarks in this room type:",
                               "Completed subgoals:", "Current subgoal:", "Observed landmarks:", "Last message:"}) {
        CAPTURE(needle);
        CHECK(b.agent_message.find(needle) != std::string::npos);
    }
}

TEST_CASE("template helpers") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(python_list({"CounterTop", "StoveBurner"}) == "['CounterTop', 'StoveBurner']");
    CHECK(python_list({}) == "[]");
    CHECK(render("a {{x}} b {{x}}", {{"x", "1"}}) == "a 1 b 1");
    CHECK_THROWS_AS(render("{{missing}}", {}), TemplateError);
    CHECK_THROWS_AS(Templates::load("/nonexistent/templates"), TemplateError);
}

TEST_CASE("parser accepts recovery plans") {
    const auto r = parse_response(slurp(kData + "/fixtures/recovery_fridge.txt"), kitchen(), sg(SubgoalAction::PickupObject, Category::Mug));
    REQUIRE(r.subgoals.size() == 3);
    CHECK(r.subgoals[0].same_step(sg(SubgoalAction::GotoLocation, Category::Fridge)));
    CHECK(r.subgoals[1].same_step(sg(SubgoalAction::OpenObject, Category::Fridge)));
    CHECK(r.subgoals[2].same_step(sg(SubgoalAction::PickupObject, Category::Mug)));
    CHECK(r.reasoning.find("fridge is closed") != std::string::npos);

    const auto loose = parse_response(slurp(kData + "/fixtures/recovery_cabinet_loose.txt"), kitchen(),
                                      sg(SubgoalAction::PickupObject, Category::Mug));
    REQUIRE(loose.subgoals.size() == 3);
    CHECK(loose.subgoals[1].same_step(sg(SubgoalAction::OpenObject, Category::Cabinet)));

    CompletionResponse round{"Because.", {sg(SubgoalAction::OpenObject, Category::Drawer), sg(SubgoalAction::PutObject, Category::Drawer)}};
    const auto back = parse_response(format_response(round), kitchen(), sg(SubgoalAction::PutObject, Category::Drawer));
    CHECK(back.subgoals == round.subgoals);
}

TEST_CASE("parser rejects bad plans") {
    const Subgoal mug = sg(SubgoalAction::PickupObject, Category::Mug);
    const std::pair<const char*, ParseErrorKind> cases[] = {
        {"bad_hallucinated.txt", ParseErrorKind::HallucinatedObject},
        {"bad_out_of_room.txt", ParseErrorKind::HallucinatedObject},
        {"bad_missing_terminal.txt", ParseErrorKind::MissingTerminalSubgoal},
        {"bad_wrong_terminal.txt", ParseErrorKind::MissingTerminalSubgoal},
        {"bad_no_plan.txt", ParseErrorKind::MalformedStructure},
        {"bad_empty_plan.txt", ParseErrorKind::MalformedStructure},
    };
    for (const auto& [file, kind] : cases) {
        CAPTURE(file);
        try {
            parse_response(slurp(kData + "/fixtures/" + file), kitchen(), mug);
            FAIL("accepted");
        } catch (const ParseError& e) {
            CHECK(parse_error_name(e.kind()) == parse_error_name(kind));
        }
    }
}

TEST_CASE("oracle follows the containment chain") {
    auto s = tiny_scene();
    const auto fridge = add(s, Category::Fridge, {0, 2});
    add(s, Category::Mug, {0, 2}, fridge);
    add(s, Category::CounterTop, {0, 4});
    const auto apple_counter = add(s, Category::CounterTop, {2, 0});
    add(s, Category::Apple, {2, 0}, apple_counter);
    add(s, Category::Cabinet, {5, 0});
    const auto cab2 = add(s, Category::Cabinet, {5, 2});
    add(s, Category::Cabinet, {5, 4});
    add(s, Category::Cloth, {5, 2}, cab2);
    CHECK(world::validate_scene(s) == "");
    const auto truth = world::WorldState::start(s);

    const auto r = oracle_complete(truth, sg(SubgoalAction::PickupObject, Category::Mug));
    REQUIRE(r.subgoals.size() == 3);
    CHECK(r.subgoals[0].same_step(sg(SubgoalAction::GotoLocation, Category::Fridge)));
    CHECK(r.subgoals[1].same_step(sg(SubgoalAction::OpenObject, Category::Fridge)));
    CHECK(r.subgoals[2].same_step(sg(SubgoalAction::PickupObject, Category::Mug)));
    for (const auto& x : r.subgoals) CHECK(x.position == world::Cell{0, 2});

    const auto apple = oracle_complete(truth, sg(SubgoalAction::PickupObject, Category::Apple));
    REQUIRE(apple.subgoals.size() == 1);
    CHECK(apple.subgoals[0].position == world::Cell{2, 0});

    const auto cloth = oracle_complete(truth, sg(SubgoalAction::PickupObject, Category::Cloth));
    REQUIRE(cloth.subgoals.size() == 3);
    CHECK(cloth.subgoals[0].object == Category::Cabinet);
    CHECK(cloth.subgoals[0].position == world::Cell{5, 2});

    try {
        oracle_complete(truth, sg(SubgoalAction::PickupObject, Category::Knife));
        FAIL("no knife exists");
    } catch (const CompleterError& e) {
        CHECK(e.kind() == CompleterError::Kind::TargetAbsent);
    }
}

TEST_CASE("backends") {
    const auto [scene, task] = world::generate_scene(3, world::RoomType::Kitchen, true);
    const auto truth = world::WorldState::start(scene);
    CompletionRequest req;
    req.bundle = build_prompt(Templates::defaults(), task, {}, {}, kitchen(), "");
    req.current = sg(SubgoalAction::PickupObject, task.goal_object);
    req.truth = &truth;

    auto oracle = make_backend("oracle");
    const auto text = oracle->complete(req);
    const auto parsed = parse_response(text, names(world::possible_landmarks(scene.room_type)), req.current);
    CHECK(parsed.subgoals.back().same_step(req.current));

    auto scripted = make_backend("scripted:" + kData + "/fixtures/scripted.jsonl");
    CHECK(scripted->complete(req) == "Reason: The mug is in the fridge.\nPlan:\n1. GotoLocation Fridge\n2. OpenObject Fridge\n3. PickupObject Mug");
    try {
        scripted->complete(req);
        FAIL("fixture should be exhausted");
    } catch (const CompleterError& e) {
        CHECK(e.kind() == CompleterError::Kind::FixtureExhausted);
    }

    ScriptedBackend keyed;
    keyed.add(prompt_hash(req.bundle), "exact");
    keyed.add("*", "fallback");
    CHECK(keyed.complete(req) == "exact");
    CHECK(keyed.complete(req) == "fallback");
    CHECK_THROWS_AS(make_backend("carrier-pigeon"), CompleterError);
}

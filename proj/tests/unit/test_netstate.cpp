#include <gtest/gtest.h>

#include "iabsim/netstate.hpp"

using namespace iabsim;

namespace {

// donor 0 <- relay 1 <- relay 2, plus relay 3 -> donor; UE 4 reaches 2 and 3
struct Fixture {
  NetworkGraph graph{600.0, 600.0};
  std::vector<Flow> flows;

  Fixture() {
    graph.add_node(NodeKind::Donor, {0, 0});
    graph.add_node(NodeKind::Iab, {200, 0});
    graph.add_node(NodeKind::Iab, {400, 0});
    graph.add_node(NodeKind::Iab, {0, 200});
    graph.add_node(NodeKind::Ue, {400, 200});
    graph.add_link(NodeId{1}, NodeId{0});
    graph.add_link(NodeId{2}, NodeId{1});
    graph.add_link(NodeId{3}, NodeId{0});
    graph.add_link(NodeId{4}, NodeId{2});
    graph.add_link(NodeId{4}, NodeId{3});
    Flow f;
    f.id = FlowId{0};
    f.source = NodeId{4};
    f.generation_period = 10;
    f.paths = {Path{{NodeId{4}, NodeId{2}, NodeId{1}, NodeId{0}}}, Path{{NodeId{4}, NodeId{3}, NodeId{0}}}};
    resolve_links(graph, f);
    flows.push_back(f);
  }
};

Packet pkt(Slot tau, std::uint8_t path = 0, std::uint32_t seq = 0) { return {FlowId{0}, path, tau, seq}; }

}  // namespace

TEST(QueueUpdate, Recursion) {
  EXPECT_EQ(apply_queue_update(3, 1, 1), 3u);
  EXPECT_EQ(apply_queue_update(0, 0, 0), 0u);
  EXPECT_EQ(apply_queue_update(2, 0, 5), 0u);
  EXPECT_EQ(apply_queue_update(2, 3, 1), 4u);
}

TEST(Generate, DualFlowQueuesTwoCopiesWithSameTimestamp) {
  Fixture fx;
  NetState st(fx.graph, fx.flows, 8);
  auto copies = st.generate_and_duplicate(fx.flows[0], 10);
  ASSERT_EQ(copies.size(), 2u);
  EXPECT_EQ(copies[0].generated, 10);
  EXPECT_EQ(copies[1].generated, 10);
  EXPECT_EQ(copies[0].path, 0);
  EXPECT_EQ(copies[1].path, 1);
  EXPECT_EQ(copies[0].seq, copies[1].seq);
  EXPECT_EQ(st.queue_length(NodeId{4}, FlowId{0}), 2u);
  EXPECT_EQ(st.queue_length(NodeId{4}, FlowId{0}, 0), 1u);
  EXPECT_EQ(st.queue_length(NodeId{4}, FlowId{0}, 1), 1u);
  EXPECT_EQ(st.age(NodeId{4}, FlowId{0}), 0);
  EXPECT_EQ(st.counters().generated, 2u);
  EXPECT_TRUE(st.conserved());
}

TEST(Generate, SinglePathFlowQueuesOneCopy) {
  Fixture fx;
  fx.flows[0].paths.resize(1);
  resolve_links(fx.graph, fx.flows[0]);
  NetState st(fx.graph, fx.flows, 8);
  auto copies = st.generate_and_duplicate(fx.flows[0], 10);
  ASSERT_EQ(copies.size(), 1u);
  EXPECT_EQ(copies[0].generated, 10);
}

TEST(Dequeue, TakesOldestPacketOfThePath) {
  Fixture fx;
  NetState st(fx.graph, fx.flows, 8);
  st.generate_and_duplicate(fx.flows[0], 10);
  st.generate_and_duplicate(fx.flows[0], 20);
  Packet p = st.dequeue(NodeId{4}, FlowId{0}, 1);
  EXPECT_EQ(p.path, 1);
  EXPECT_EQ(p.generated, 10);
  EXPECT_EQ(st.queue_length(NodeId{4}, FlowId{0}, 1), 1u);
  EXPECT_EQ(st.queue_length(NodeId{4}, FlowId{0}, 0), 2u);
  EXPECT_THROW(st.dequeue(NodeId{2}, FlowId{0}, 0), InvariantViolation);
}

TEST(Admission, CapSemanticsPerPolicy) {
  Fixture fx;
  NetState st(fx.graph, fx.flows, 8);
  for (int i = 0; i < 7; ++i) st.admit_or_overflow(NodeId{2}, pkt(1), AdmissionPolicy::DropOnFull, NodeId{4});
  EXPECT_FALSE(st.full(NodeId{2}));
  EXPECT_EQ(st.admit_or_overflow(NodeId{2}, pkt(1), AdmissionPolicy::DropOnFull, NodeId{4}), Admission::Admitted);
  EXPECT_TRUE(st.full(NodeId{2}));
  EXPECT_EQ(st.admit_or_overflow(NodeId{2}, pkt(1), AdmissionPolicy::DropOnFull, NodeId{4}), Admission::Overflowed);
  EXPECT_EQ(st.occupancy(NodeId{2}), 8u);
  EXPECT_EQ(st.counters().dropped, 1u);
  EXPECT_THROW(st.admit_or_overflow(NodeId{2}, pkt(1), AdmissionPolicy::RfasGuard, NodeId{4}), InvariantViolation);
  EXPECT_EQ(st.admit_or_overflow(NodeId{2}, pkt(1), AdmissionPolicy::AdmitAndRecord, NodeId{4}), Admission::Overflowed);
  EXPECT_EQ(st.occupancy(NodeId{2}), 9u);
  EXPECT_EQ(st.counters().overflows, 2u);
}

TEST(Admission, DonorAndUesAreUncapped) {
  Fixture fx;
  NetState st(fx.graph, fx.flows, 1);
  EXPECT_FALSE(st.capped(kDonor));
  EXPECT_FALSE(st.capped(NodeId{4}));
  EXPECT_TRUE(st.capped(NodeId{1}));
  for (int i = 0; i < 5; ++i) st.generate_and_duplicate(fx.flows[0], i + 1);
  EXPECT_FALSE(st.full(NodeId{4}));
}

TEST(Delivery, FreshThenDuplicate) {
  Fixture fx;
  NetState st(fx.graph, fx.flows, 8);
  // tau* = 5 first
  EXPECT_EQ(st.deliver_to_destination(pkt(5), NodeId{1}), DeliveryOutcome::Fresh);
  st.tick_aoi(5);
  EXPECT_EQ(st.deliver_to_destination(pkt(8), NodeId{1}), DeliveryOutcome::Fresh);
  st.tick_aoi(9);
  EXPECT_EQ(st.destination_age(FlowId{0}), 2);  // A(10) = 10 - 8
  EXPECT_EQ(st.deliver_to_destination(pkt(8, 1), NodeId{3}), DeliveryOutcome::DuplicateDiscarded);
  EXPECT_EQ(st.deliver_to_destination(pkt(3), NodeId{1}), DeliveryOutcome::DuplicateDiscarded);
  EXPECT_EQ(st.watermark(FlowId{0}), 8);
}

TEST(Delivery, BothCopiesSameSlotOrderIndependent) {
  for (int order = 0; order < 2; ++order) {
    Fixture fx;
    NetState st(fx.graph, fx.flows, 8);
    Packet a = pkt(8, 0), b = pkt(8, 1);
    auto first = st.deliver_to_destination(order ? b : a, order ? NodeId{3} : NodeId{1});
    auto second = st.deliver_to_destination(order ? a : b, order ? NodeId{1} : NodeId{3});
    EXPECT_EQ(first, DeliveryOutcome::Fresh);
    EXPECT_EQ(second, DeliveryOutcome::DuplicateDiscarded);
    st.tick_aoi(9);
    EXPECT_EQ(st.destination_age(FlowId{0}), 2);
  }
}

TEST(Aoi, NoDeliveriesAgesEverything) {
  Fixture fx;
  NetState st(fx.graph, fx.flows, 8);
  for (std::uint32_t n = 0; n < 5; ++n) EXPECT_EQ(st.age(NodeId{n}, FlowId{0}), 1);
  st.tick_aoi(1);
  for (std::uint32_t n = 0; n < 5; ++n) {
    EXPECT_EQ(st.age(NodeId{n}, FlowId{0}), 2);
    EXPECT_EQ(st.hop_age(NodeId{n}, FlowId{0}), 2);
  }
}

TEST(Aoi, RelayReceivingCurrentPacketHasAgeOne) {
  Fixture fx;
  NetState st(fx.graph, fx.flows, 8);
  st.generate_and_duplicate(fx.flows[0], 7);
  Packet p = st.dequeue(NodeId{4}, FlowId{0}, 0);
  st.admit_or_overflow(NodeId{2}, p, AdmissionPolicy::RfasGuard, NodeId{4});
  st.tick_aoi(7);
  EXPECT_EQ(st.age(NodeId{2}, FlowId{0}), 1);
  EXPECT_EQ(st.hop_age(NodeId{2}, FlowId{0}), 1);
}

TEST(Aoi, StalePacketDoesNotRefresh) {
  Fixture fx;
  NetState st(fx.graph, fx.flows, 8);
  st.admit_or_overflow(NodeId{2}, pkt(6), AdmissionPolicy::RfasGuard, NodeId{4});
  st.tick_aoi(6);
  EXPECT_EQ(st.age(NodeId{2}, FlowId{0}), 1);
  st.admit_or_overflow(NodeId{2}, pkt(3), AdmissionPolicy::RfasGuard, NodeId{4});
  st.tick_aoi(7);
  EXPECT_EQ(st.age(NodeId{2}, FlowId{0}), 2);
  EXPECT_EQ(st.freshest(NodeId{2}, FlowId{0}), 6);
}

TEST(StaleDiscardModes, SiblingAndSuperseded) {
  for (auto mode : {StaleDiscard::Off, StaleDiscard::Sibling, StaleDiscard::Superseded}) {
    Fixture fx;
    NetState st(fx.graph, fx.flows, 8);
    st.generate_and_duplicate(fx.flows[0], 10);  // seq 0
    st.generate_and_duplicate(fx.flows[0], 20);  // seq 1
    // seq 0 path 0 sits at a relay, seq 1 path 0 reaches the destination
    Packet oldest = st.dequeue(NodeId{4}, FlowId{0}, 0);
    st.admit_or_overflow(NodeId{2}, oldest, AdmissionPolicy::RfasGuard, NodeId{4});
    Packet newest = st.dequeue(NodeId{4}, FlowId{0}, 0);
    ASSERT_EQ(newest.seq, 1u);
    st.deliver_to_destination(newest, NodeId{1});
    st.tick_aoi(20);
    const auto purged = st.purge_stale(mode);
    switch (mode) {
      case StaleDiscard::Off: EXPECT_EQ(purged, 0u); break;
      case StaleDiscard::Sibling: EXPECT_EQ(purged, 1u); break;     // seq 1 on path 1 only
      case StaleDiscard::Superseded: EXPECT_EQ(purged, 3u); break;  // everything is <= 20
    }
    EXPECT_TRUE(st.conserved());
  }
}

TEST(Conservation, CountsEveryOutcome) {
  Fixture fx;
  NetState st(fx.graph, fx.flows, 1);
  st.generate_and_duplicate(fx.flows[0], 1);
  Packet a = st.dequeue(NodeId{4}, FlowId{0}, 0);
  Packet b = st.dequeue(NodeId{4}, FlowId{0}, 1);
  st.admit_or_overflow(NodeId{2}, a, AdmissionPolicy::DropOnFull, NodeId{4});
  st.admit_or_overflow(NodeId{2}, b, AdmissionPolicy::DropOnFull, NodeId{4});  // dropped
  EXPECT_TRUE(st.conserved());
  EXPECT_EQ(st.counters().dropped, 1u);
  EXPECT_EQ(st.total_queued(), 1u);
}

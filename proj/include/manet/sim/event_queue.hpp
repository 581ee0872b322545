#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "manet/sim/errors.hpp"
#include "manet/sim/sim_time.hpp"

namespace manet {

/// Time-ordered event queue with a simulated clock.
///
/// Events at the same instant fire in insertion order; (fire_at, seq) is a
/// total order over everything ever scheduled on one queue.
template <class Action>
class EventQueue {
public:
    struct Event {
        SimTime fire_at;
        std::uint64_t seq;
        NodeId target;
        Action action;
    };

    void schedule(SimTime at, NodeId target, Action action)
    {
        if (at < m_now) {
            throw SchedulingInPast("event at " + at.to_string() + " scheduled when clock is " + m_now.to_string());
        }
        m_heap.push(Event{at, m_next_seq++, target, std::move(action)});
    }

    /// Dispatches every event with fire_at <= end, then sets the clock to end.
    template <class Handler>
    std::size_t run_until(SimTime end, Handler&& handler)
    {
        if (end < m_now) {
            throw SchedulingInPast("run_until " + end.to_string() + " is before clock " + m_now.to_string());
        }
        std::size_t dispatched = 0;
        while (!m_heap.empty() && m_heap.top().fire_at <= end) {
            // priority_queue::top is const; the event is copied out before pop.
            Event ev = m_heap.top();
            m_heap.pop();
            m_now = ev.fire_at;
            handler(ev);
            ++dispatched;
        }
        m_now = end;
        return dispatched;
    }

    SimTime now() const { return m_now; }
    std::size_t pending() const { return m_heap.size(); }
    bool empty() const { return m_heap.empty(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> m_heap;
    SimTime m_now;
    std::uint64_t m_next_seq = 0;
};

}  // namespace manet

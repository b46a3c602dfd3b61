#include "actsim/engine.hpp"

#include <memory>
#include <sstream>

#include "actsim/error.hpp"

namespace actsim {

std::string format_ps(std::int64_t ps) {
    std::ostringstream os;
    os << ps << " ps";
    return os.str();
}

Engine::~Engine() {
    while (!queue_.empty()) {
        delete queue_.top();
        queue_.pop();
    }
}

EventHandle Engine::schedule(TimedEvent ev, Action action) {
    if (ev.at < now_) {
        std::ostringstream os;
        os << "event in past: at=" << ev.at.ps << " ps, now=" << now_.ps << " ps (code 0x"
           << std::hex << static_cast<int>(ev.code) << ")";
        throw SchedulingError(os.str());
    }
    auto* p = new Pending{ev.at, next_seq_++, std::move(ev), std::move(action)};
    queue_.push(p);
    return EventHandle{p->seq};
}

bool Engine::cancel(EventHandle h) {
    if (h.id >= next_seq_) return false;
    return cancelled_.insert(h.id).second;
}

std::size_t Engine::run_until(SimTime t) {
    if (t < now_) throw SchedulingError("run_until into the past");
    std::size_t delivered = 0;
    while (!queue_.empty() && !(t < queue_.top()->at)) {
        std::unique_ptr<Pending> p(queue_.top());
        queue_.pop();
        if (cancelled_.erase(p->seq) > 0) continue;
        now_ = p->at;
        log_.push_back(LogRecord{p->ev.at, p->ev.code, p->ev.payload, p->ev.source});
        if (p->action) p->action(p->ev);
        for (auto& l : listeners_) l(p->ev);
        ++delivered;
    }
    now_ = t;
    return delivered;
}

std::string Engine::format_log() const {
    std::ostringstream os;
    for (const auto& r : log_) {
        os << r.at.ps << '\t';
        os << "0x";
        static const char* hexd = "0123456789abcdef";
        os << hexd[(r.code >> 4) & 0xF] << hexd[r.code & 0xF] << '\t';
        if (r.payload)
            os << *r.payload;
        else
            os << '-';
        os << '\t' << r.source << '\n';
    }
    return os.str();
}

}  // namespace actsim

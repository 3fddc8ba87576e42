#include "fs3a/mecsys/entities.hpp"

namespace fs3a::mecsys {

void UeAgent::reset_outcome() {
    token_.clear();
    session_.clear();
    data_.reset();
    errors_.clear();
}

void UeAgent::login(cellular::Ue& ue) {
    ue.mark(ue.id() + ".login_start");
    if (!plan_.token.empty())
        ue.send(plan_.app, app::TokenPresent{plan_.token});
    else
        ue.send(plan_.app, app::LoginStart{plan_.app_id});
}

void UeAgent::on_attached(cellular::Ue& ue) {
    if (plan_.login && !plan_.app.empty()) login(ue);
}

void UeAgent::on_app_message(cellular::Ue& ue, const Delivery& d, const Message& msg) {
    (void)d;
    if (const auto* m = std::get_if<app::AuthRedirect>(&msg)) {
        ue.send(m->idp, app::OidcAuthRequest{m->client_id, plan_.app});
    } else if (const auto* m = std::get_if<app::OidcAuthResponse>(&msg)) {
        if (!m->error.empty()) {
            errors_.push_back(app::AppError{"OidcAuthResponse", m->error});
            return;
        }
        token_ = m->token;
        ue.mark(ue.id() + ".token");
        ue.send(plan_.app, app::TokenPresent{token_});
    } else if (const auto* m = std::get_if<app::LoginOk>(&msg)) {
        session_ = m->session_id;
        ue.mark(ue.id() + ".login_ok");
        if (!plan_.resume) return;
        auto go = [this, &ue] {
            ue.mark(ue.id() + ".resume_sent");
            ue.send(plan_.app, app::Resume{session_});
        };
        if (plan_.resume_delay_ms > 0.0)
            ue.after(plan_.resume_delay_ms, go);
        else
            go();
    } else if (const auto* m = std::get_if<app::Data>(&msg)) {
        data_ = m->payload;
        ue.mark(ue.id() + ".data");
    } else if (const auto* m = std::get_if<app::AppError>(&msg)) {
        errors_.push_back(*m);
        ue.mark(ue.id() + ".error");
    }
}

} // namespace fs3a::mecsys
